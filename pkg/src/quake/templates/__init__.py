"""Shipped reference models and report templates."""
