"""Prompt templates for the one-shot annotation messages, one Markdown file per mode and role."""
