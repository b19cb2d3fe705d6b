"""
Laboratory launcher.

Usage:
    python scripts/run_lab.py run configs/smoke.json --output out/smoke
    python scripts/run_lab.py check configs/smoke.json
    python scripts/run_lab.py refine configs/smoke.json --ladder dt=0.02,0.01,0.005
"""

import sys
from pathlib import Path

# Add parent directory to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from cli.main import execute

if __name__ == "__main__":
    sys.exit(execute(sys.argv[1:]))
