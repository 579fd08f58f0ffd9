"""
Общие утилиты проекта: настройки, файлы результатов, численные проверки.
"""
