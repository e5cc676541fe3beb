# src/holder_lab/version.py
from importlib.metadata import PackageNotFoundError, version


def get_version() -> str:
    try:
        return version("holder-lab")
    except PackageNotFoundError:
        # editable/dev runs without installed metadata
        return "0.1.0"
