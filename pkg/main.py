## ────────────── Точка входа innokit ──────────────
import sys

from utils.logging_config import setup_logging

# initialize logging early
setup_logging()

from handlers import dispatch  # noqa: E402


def main() -> int:
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    raise SystemExit(main())
