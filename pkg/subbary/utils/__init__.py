# Exact arithmetic, settings, serialization and the result store
