import argparse
import importlib
from pathlib import Path
import sys
from colorama import Fore, Style

import utils
from utils import ValidationError, EXIT_OK, EXIT_VALIDATION, EXIT_IO

EXIT_INTERRUPTED = 130


def print_logo():
    """Print ASCII logo for GESI"""
    logo = f"""{Fore.CYAN}
     ██████╗ ███████╗███████╗██╗
    ██╔════╝ ██╔════╝██╔════╝██║
    ██║  ███╗█████╗  ███████╗██║
    ██║   ██║██╔══╝  ╚════██║██║
    ╚██████╔╝███████╗███████║██║
     ╚═════╝ ╚══════╝╚══════╝╚═╝
    Gammachirp envelope similarity index
    {Style.RESET_ALL}
    """
    print(logo)


def build_parser() -> argparse.ArgumentParser:
    """Set up the CLI and dynamically register commands from modules in subfolders."""
    parser = argparse.ArgumentParser(
        description="Objective speech intelligibility for normal and impaired hearing",
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument("--workers", type=int, help="Number of worker processes")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Only the main module file named after the folder (e.g. metric/metric.py) registers commands
    modules_dir = Path(__file__).parent / 'modules'
    for module_folder in sorted(modules_dir.iterdir()):
        if module_folder.is_dir():
            main_module_file = module_folder / f"{module_folder.name}.py"
            if main_module_file.exists():
                module_name = f"modules.{module_folder.name}.{module_folder.name}"
                try:
                    module = importlib.import_module(module_name)
                    if hasattr(module, 'register_command'):
                        module.register_command(subparsers)
                    else:
                        utils.warn(f"Module {module_name} does not have a 'register_command' function.")
                except ImportError as e:
                    utils.error(f"Error importing module {module_name}: {e}")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv

    if not argv:
        print_logo()
        parser.print_help()
        return EXIT_OK

    args = parser.parse_args(argv)
    if not hasattr(args, 'func'):
        print_logo()
        parser.print_help()
        return EXIT_VALIDATION

    try:
        args.func(args)
    except ValidationError as e:
        utils.error(str(e))
        return EXIT_VALIDATION
    except OSError as e:
        utils.error(str(e))
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("Quitting job...")
        sys.exit(EXIT_INTERRUPTED)
