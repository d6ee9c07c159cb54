"""
Writers for experiment outputs.
"""
from regen_stable.output.writers import output_dir, write_csv, write_json, write_summary

__all__ = ["output_dir", "write_csv", "write_json", "write_summary"]
