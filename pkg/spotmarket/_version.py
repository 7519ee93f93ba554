__version__ = '0.1.0'


def get_versions():
    return {'version': __version__}
