"""Typer command handlers for the sdohkit CLI."""
