# Loaded automatically by scripts run in the task sandbox: outbound network
# connections are refused.
import socket


def _blocked(*args, **kwargs):
    raise OSError("network access is disabled in the task sandbox")


socket.socket.connect = _blocked
socket.socket.connect_ex = _blocked
socket.create_connection = _blocked
