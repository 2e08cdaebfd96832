# -*- coding: utf-8 -*-
#
# Sphinx configuration for the pysilver API documentation.

import datetime
import os
import sys

sys.path.insert(0, os.path.abspath('../'))
from util import parse

project = 'pysilver'
author = 'The pysilver developers'
copyright = '{}, {}'.format(datetime.date.today().year, author)

version = parse.package_version('../pysilver/_version.py').strip()
release = version

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.viewcode'
]

# Docstrings are Google style throughout.
napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_include_init_with_doc = True

autodoc_member_order = 'bysource'

source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'pysilverdoc'

man_pages = [(master_doc, 'pysilver', 'pysilver Documentation', [author], 1)]
