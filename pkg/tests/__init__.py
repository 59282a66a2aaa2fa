"""
Пакет тестов innokit
"""
