import os
import unittest

# full-scale runs take minutes each
slow = unittest.skipUnless(os.getenv('RANKONE_SLOW'), 'set RANKONE_SLOW=1 to run full-scale cases')
