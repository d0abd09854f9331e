# src/db/queries.py

ALLOWED_TABLES = [
    "runs",
    "experiment_rows",
]

CREATE_ALL_TABLES = {
    "runs": """
                CREATE TABLE IF NOT EXISTS runs (
                    digest TEXT,
                    experiment TEXT,
                    seed INTEGER,
                    config TEXT,
                    PRIMARY KEY (digest, experiment)
                )
            """,
    "experiment_rows": """
                CREATE TABLE IF NOT EXISTS experiment_rows (
                    digest TEXT,
                    experiment TEXT,
                    row_index INTEGER,
                    point_k INTEGER,
                    point_s_or_gamma_or_alpha REAL,
                    method TEXT,
                    success_rate REAL,
                    rmse REAL,
                    lhs REAL,
                    holds INTEGER,
                    valid INTEGER,
                    trials INTEGER,
                    seed INTEGER,
                    PRIMARY KEY (digest, experiment, row_index)
                )
            """,
}


INSERT_OR_IGNORE_QUERY = (
    "INSERT OR IGNORE INTO {table_name} ({columns}) VALUES ({placeholders})"
)

GET_ROW_COUNT = "SELECT COUNT(*) FROM {table_name}"

GET_RUN_DIGESTS = "SELECT digest FROM runs WHERE experiment = ?;"

READ_TABLE_TO_DF = "SELECT * FROM {table_name};"

READ_RUN_ROWS = """
    SELECT * FROM experiment_rows
    WHERE digest = ? AND experiment = ?
    ORDER BY row_index;
"""
