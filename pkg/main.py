from src.chebylie import main
import sys


# e.g. python main.py jacobian G2 -k 2 --method both
if __name__ == "__main__":
    sys.exit(main.run())
