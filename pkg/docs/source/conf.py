# -*- coding: utf-8 -*-
#
# fluidaoi documentation build configuration file.

import os

extensions = []
source_suffix = '.rst'
master_doc = 'index'

project = u'fluidaoi'
copyright = u'2026, fluidaoi developers'
author = u'fluidaoi developers'
version = u'0.1.0'
release = u'0.1.0'

pygments_style = 'sphinx'

# readthedocs applies its own theme
if not os.environ.get('READTHEDOCS', None):
    import sphinx_rtd_theme
    html_theme = 'sphinx_rtd_theme'
    html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

htmlhelp_basename = 'fluidaoidoc'
