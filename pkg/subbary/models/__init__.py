# Domain records and the exception hierarchy
