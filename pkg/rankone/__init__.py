__version__ = '0.3.0'
__author__ = 'RicterZ&KanoTonka'
__email__ = 'ricterzheng@gmail.com'
