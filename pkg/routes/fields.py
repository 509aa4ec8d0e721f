import json
import logging
import math
import os

from errors import ConfigError, ConvergenceError, SDSpaceError
from models import jsonable
from services.catalog import describe_catalog, field_from_ref
from services.reports import (
    EXIT_ASSERTION,
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_UNCONVERGED,
    write_json,
    write_norm_result,
    write_run_meta,
)
from services.sd_space import functional_table, inner_from_tables, norm_from_table, truncation_specs

logger = logging.getLogger("sdspace.routes.fields")


def parse_exponent(text):
    value = str(text).strip().lower()
    if value in ("inf", "infinity", "oo"):
        return math.inf
    try:
        p = float(value)
    except ValueError:
        raise ConfigError(f"bad exponent {text!r}")
    if not p >= 1:
        raise ConfigError("p must be >= 1 or inf")
    return p


def _emit(payload):
    print(json.dumps(jsonable(payload), indent=2, sort_keys=True))


def holder_check(value, ta, tb, trunc, rel_tol=1e-12):
    """|<f, g>| <= ||f||_SD2 ||g||_SD2 on the same truncation"""
    norm_a = norm_from_table(ta, 2.0, trunc).value
    norm_b = norm_from_table(tb, 2.0, trunc).value
    bound = norm_a * norm_b
    return {
        "norm_a": norm_a,
        "norm_b": norm_b,
        "bound": bound,
        "holds": bool(abs(value) <= bound * (1.0 + rel_tol)),
    }


def cmd_norm(args, config, pool):
    """Print ||f||_SD^p as JSON"""
    try:
        p = parse_exponent(args.p)
        f = field_from_ref(args.field, config.dimension, config.catalog)
        trunc = config.trunc
        table = functional_table(f, trunc, pool)
        result = norm_from_table(table, p, trunc, f)
        payload = result.to_dict(contributions=config.contributions)
        payload["support_radius"] = f.support_radius
        _emit(payload)
        if config.contributions:
            write_norm_result(result, config.out_dir, "norm", contributions=True)
        code = EXIT_OK if result.converged else EXIT_UNCONVERGED
        if code != EXIT_OK:
            logger.warning(f"Norm of {f.label} used unconverged quadrature")
        write_run_meta(config.out_dir, f"norm {args.field}", config.to_dict(), code)
        return code
    except ConvergenceError as e:
        logger.error(f"Norm of {args.field} did not converge: {str(e)}")
        write_run_meta(config.out_dir, f"norm {args.field}", config.to_dict(), EXIT_UNCONVERGED)
        return EXIT_UNCONVERGED
    except (SDSpaceError, OSError, ValueError) as e:
        logger.error(f"Error computing norm of {args.field}: {str(e)}")
        return EXIT_CONFIG


def cmd_inner(args, config, pool):
    """Print <f, g>_SD2 as JSON"""
    try:
        f = field_from_ref(args.field_a, config.dimension, config.catalog)
        g = field_from_ref(args.field_b, config.dimension, config.catalog)
        trunc = config.trunc
        specs = truncation_specs(config.dimension, trunc)
        ta = functional_table(f, trunc, pool, specs)
        tb = functional_table(g, trunc, pool, specs)
        converged = ta.converged and tb.converged
        value = inner_from_tables(ta, tb)
        holder = holder_check(value, ta, tb, trunc)
        payload = {
            "a": f.label,
            "b": g.label,
            "value": value,
            "holder": holder,
            "k_max": trunc.k_max,
            "m_max": trunc.m_max,
            "converged": converged,
        }
        _emit(payload)
        if config.contributions:
            write_json(os.path.join(config.out_dir, "inner.json"), payload)
        code = EXIT_OK if converged else EXIT_UNCONVERGED
        if not holder["holds"]:
            logger.error(f"|<{f.label}, {g.label}>| = {abs(value):.6e} exceeds {holder['bound']:.6e}")
            code = EXIT_ASSERTION
        write_run_meta(config.out_dir, f"inner {args.field_a} {args.field_b}", config.to_dict(), code)
        return code
    except ConvergenceError as e:
        logger.error(f"Inner product did not converge: {str(e)}")
        write_run_meta(config.out_dir, f"inner {args.field_a} {args.field_b}", config.to_dict(), EXIT_UNCONVERGED)
        return EXIT_UNCONVERGED
    except (SDSpaceError, OSError, ValueError) as e:
        logger.error(f"Error computing inner product: {str(e)}")
        return EXIT_CONFIG


def cmd_catalog(args, config, pool):
    _emit(describe_catalog())
    return EXIT_OK


def init_routes(subparsers, parents=()):
    norm = subparsers.add_parser("norm", parents=list(parents), help="SD^p norm of a field")
    norm.add_argument("field", help="family[:key=value,...] or a grid CSV path")
    norm.add_argument("--p", default="2", help="exponent in [1, inf], default 2")
    norm.set_defaults(handler=cmd_norm)

    inner = subparsers.add_parser("inner", parents=list(parents), help="SD^2 inner product of two fields")
    inner.add_argument("field_a")
    inner.add_argument("field_b")
    inner.set_defaults(handler=cmd_inner)

    listing = subparsers.add_parser("catalog", parents=list(parents), help="list built-in field families")
    listing.set_defaults(handler=cmd_catalog)
