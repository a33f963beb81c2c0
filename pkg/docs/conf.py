# Sphinx configuration for the schmidt-qfim documentation.
import os
import sys

sys.path.insert(0, os.path.abspath('..'))

import schmidt_qfim  # pylint: disable=wrong-import-position

project = 'schmidt-qfim'
author = 'schmidt-qfim developers'
copyright = '2024, ' + author  # pylint: disable=redefined-builtin
version = schmidt_qfim.__version__
release = version

extensions = [
    'sphinx.ext.autodoc', 'sphinx_autodoc_typehints', 'sphinx.ext.mathjax',
    'sphinx.ext.viewcode', 'sphinx.ext.napoleon'
]
master_doc = 'index'
source_suffix = '.rst'
exclude_patterns = ['_build']

# States and bases are frozen dataclasses; document fields in the order declared.
autodoc_member_order = 'bysource'

html_theme = 'sphinx_rtd_theme'
html_theme_options = {'collapse_navigation': False}
