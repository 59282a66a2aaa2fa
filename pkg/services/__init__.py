"""Вычислительное ядро innokit: законы, связки, инновации."""
