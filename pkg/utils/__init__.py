"""Вспомогательные модули: логирование и файловый ввод-вывод."""
