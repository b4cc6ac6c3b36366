from importlib.metadata import PackageNotFoundError, version


def get_version():
    try:
        return version("ssdnet")
    except PackageNotFoundError:
        # package is not installed
        return "UNINSTALLED"
