import logging
import os

from errors import ConfigError, ConvergenceError, SDSpaceError
from services.reports import (
    EXIT_CONFIG,
    EXIT_UNCONVERGED,
    exit_code_for,
    format_summary,
    write_run_meta,
    write_suite_reports,
)
from services.verifier import resolve_suites, run_suites

logger = logging.getLogger("sdspace.routes.verify")


def cmd_verify(args, config, pool):
    """Run measurement suites and write their reports"""
    names = args.suite or config.suites
    try:
        names = resolve_suites(names)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG

    try:
        reports = run_suites(names, config.suite_context(pool))
        write_suite_reports(reports, config.out_dir)
    except ConvergenceError as e:
        logger.error(f"Suites {', '.join(names)} hit a divergent integral: {str(e)}")
        write_run_meta(config.out_dir, f"verify {' '.join(names)}", config.to_dict(), EXIT_UNCONVERGED)
        return EXIT_UNCONVERGED
    except (SDSpaceError, OSError) as e:
        logger.error(f"Error running suites {', '.join(names)}: {str(e)}")
        return EXIT_CONFIG

    print(format_summary(reports))
    code = exit_code_for(reports)
    for report in reports:
        for case in report.failures:
            logger.error(f"{report.suite}: {case.label} failed (residual {case.residual:.3e})")
    write_run_meta(config.out_dir, f"verify {' '.join(names)}", config.to_dict(), code)
    logger.info(f"Reports in {os.path.abspath(config.out_dir)}, exit code {code}")
    return code


def init_routes(subparsers, parents=()):
    verify = subparsers.add_parser("verify", parents=list(parents), help="run measurement suites")
    verify.add_argument("--suite", nargs="+", help="suite names or 'all' (default from config)")
    verify.set_defaults(handler=cmd_verify)
