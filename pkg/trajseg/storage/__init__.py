# Storage layer for points files, models and reports
