"""Network layer: wire protocol, rooms, HTTP/WebSocket app, and CLI."""
