"""CLI command handlers package"""
