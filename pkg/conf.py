# Sphinx configuration for the latkit API reference (index.rst).
import os
import sys
sys.path.insert(0, os.path.abspath('.'))

from latkit import __version__

project = 'latkit'
copyright = '2024, latkit developers'
author = 'latkit developers'
release = __version__

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinx.ext.napoleon',
]
master_doc = 'index'
exclude_patterns = ['_build', 'examples', 'tests']
html_theme = 'alabaster'
