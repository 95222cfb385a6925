# main.py
from dxd.cli import app

# ----- Entry point ------

if __name__ == "__main__":
    app()
