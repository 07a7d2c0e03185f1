"""Topic segmentation toolkit with coherence auxiliary training objectives.

The heavy lifting lives in the compiled extension module; this package
re-exports its surface.
"""

try:
    from topseg._core import *  # noqa: F401,F403  (installed wheel layout)
    from topseg._core import __version__  # noqa: F401
except ImportError:  # in-tree build: extension sits on PYTHONPATH directly
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
