""" ellie test suite initialization file."""

# License: BSD 3 clause

# Note: this file has deliberately been left empty
