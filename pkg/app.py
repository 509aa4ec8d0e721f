import argparse
import logging
import os
import signal
import sys

from config import load_config
from errors import ConvergenceError, SDSpaceError
from routes import init_routes
from services.reports import EXIT_CONFIG, EXIT_UNCONVERGED, ensure_dir
from services.workers import WorkerPool

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"

logger = logging.getLogger("sdspace.app")

worker_pool = None


def setup_logging(out_dir, level=logging.INFO):
    logging.basicConfig(level=level, format=LOG_FORMAT, datefmt=LOG_DATEFMT, stream=sys.stderr)
    root = logging.getLogger("")
    for handler in list(root.handlers):
        if isinstance(handler, logging.FileHandler):
            root.removeHandler(handler)
            handler.close()
    ensure_dir(out_dir)
    file_handler = logging.FileHandler(os.path.join(out_dir, "sdspace.log"))
    file_handler.setLevel(level)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT))
    root.addHandler(file_handler)


class SDSpaceParser(argparse.ArgumentParser):
    """Usage errors exit with the configuration error code"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    common = SDSpaceParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--out", help="output directory (overrides output.dir and SDSPACE_OUT)")
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = SDSpaceParser(prog="sdspace", description="SD^p norms and measurement suites")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=SDSpaceParser)
    init_routes(subparsers, parents=[common])
    return parser


def graceful_exit(signum, frame):
    print("\nShutting down sdspace...", file=sys.stderr)
    if worker_pool is not None:
        worker_pool.stop()
    sys.exit(130)


def main(argv=None):
    global worker_pool
    args = build_parser().parse_args(argv)
    overrides = {"output.dir": args.out} if args.out else None
    try:
        config = load_config(args.config, overrides)
        if args.out:
            config.settings["output.dir"] = args.out
        setup_logging(config.out_dir, logging.DEBUG if args.verbose else logging.INFO)
    except (SDSpaceError, OSError) as e:
        logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, datefmt=LOG_DATEFMT)
        logger.error(f"Configuration failed: {str(e)}")
        return EXIT_CONFIG

    worker_pool = WorkerPool(config.workers)
    signal.signal(signal.SIGINT, graceful_exit)
    try:
        worker_pool.start()
        return args.handler(args, config, worker_pool)
    except ConvergenceError as e:
        logger.error(f"Command {args.command} did not converge: {str(e)}")
        return EXIT_UNCONVERGED
    except (SDSpaceError, OSError) as e:
        logger.error(f"Command {args.command} failed: {str(e)}")
        return EXIT_CONFIG
    finally:
        worker_pool.stop()


if __name__ == "__main__":
    sys.exit(main())
