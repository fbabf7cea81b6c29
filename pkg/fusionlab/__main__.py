"""
Run the command line tool with ``python -m fusionlab``.
"""
from fusionlab.cli import main


main(prog_name="fusion-lab")
