# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder.

import os
import sys
sys.path.insert(0, os.path.abspath('../../'))

from qsmooth import __version__  # noqa: E402

# -- Project information -----------------------------------------------------

project = 'qsmooth'
copyright = '2026-, qsmooth developers'
author = 'qsmooth developers'

version = __version__
release = __version__

# -- General configuration ---------------------------------------------------

needs_sphinx = '1.3'

extensions = [
    'sphinx_automodapi.automodapi',
    'numpydoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
]

numpydoc_show_class_members = False

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'
language = None
exclude_patterns = []
pygments_style = 'sphinx'

# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
htmlhelp_basename = 'qsmoothdoc'

intersphinx_mapping = {'python': ('https://docs.python.org/3', None),
                       'numpy': ('https://numpy.org/doc/stable', None),
                       'xarray': ('https://docs.xarray.dev/en/stable', None)}
