import os
import sys

# Make `import config` and `import src...` work from any working directory
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
