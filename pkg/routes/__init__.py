from routes import fields, verify


def init_routes(subparsers, parents=()):
    fields.init_routes(subparsers, parents)
    verify.init_routes(subparsers, parents)
