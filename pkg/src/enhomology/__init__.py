from .manifest import TOOL_VERSION as __version__

__all__ = [
    'algdata',
    'barcplx',
    'cli',
    'coeff',
    'config',
    'errors',
    'homcalc',
    'manifest',
    'operadlab',
    'oracles',
    'treecomb',
    'twist',
]
