"""Скрипты экспериментов innokit (запуск из корня репозитория)."""
