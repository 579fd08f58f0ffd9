"""
Вспомогательные модули команд стенда
"""
