# src/db/db_manager.py
import json
import os
import sqlite3

import numpy as np
import pandas as pd
from loguru import logger

from src.config import DATABASE_PATH
from src.db.queries import (
    ALLOWED_TABLES,
    CREATE_ALL_TABLES,
    GET_ROW_COUNT,
    GET_RUN_DIGESTS,
    INSERT_OR_IGNORE_QUERY,
    READ_RUN_ROWS,
    READ_TABLE_TO_DF,
)
from src.models.experiment import ExperimentTable


def _to_sql_value(value):
    """NA becomes NULL, numpy scalars become python scalars."""
    if pd.isna(value):
        return None
    if isinstance(value, np.generic):
        return value.item()
    return value


class DatabaseManager:
    def __init__(self, db_path: str = DATABASE_PATH):
        """Initialize the DatabaseManager with a path to the database and make sure the tables exist."""
        self.db_path = db_path
        directory = os.path.dirname(db_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self.create_all_tables()
        logger.debug(f"Connected to database: {self.db_path}")

    def connect_db(self):
        """Connect to the SQLite database."""
        return sqlite3.connect(self.db_path)

    def execute_query(self, query: str, params=None):
        """Execute a query on the database."""
        try:
            with self.connect_db() as conn:
                cursor = conn.cursor()
                cursor.execute(query, params or ())
                conn.commit()
                logger.trace(f"Query executed:\n{query}\nParams:{params}")
                return cursor.fetchall()

        except sqlite3.Error as e:
            logger.error(f"Error executing query: {e}")
            raise

    def validate_table(self, table_name: str):
        if table_name not in ALLOWED_TABLES:
            raise ValueError(f"Invalid table name: {table_name}")

    def create_all_tables(self) -> None:
        """Iterates through predefined table creation queries and creates all tables."""
        for create_query in CREATE_ALL_TABLES.values():
            self.execute_query(create_query)

    def get_row_count(self, table_name: str) -> int:
        """Fetches the count of rows in the specified table"""
        self.validate_table(table_name)
        row_count = self.execute_query(GET_ROW_COUNT.format(table_name=table_name))
        return row_count[0][0] if row_count else 0

    def get_run_digests(self, experiment: str) -> list:
        """Config digests of every stored run of one experiment."""
        return [row[0] for row in self.execute_query(GET_RUN_DIGESTS, (experiment,))]

    def insert_dataframe_to_db(
        self,
        df: pd.DataFrame,
        table_name: str,
        query=INSERT_OR_IGNORE_QUERY,
    ) -> None:
        """
        Inserts data from a Pandas DataFrame into a specified SQLite database table.

        Args:
            df (pd.DataFrame): A DataFrame containing the data to insert.
            table_name (str): The name of the table to insert data into.
            query (str): The predefined SQL query for inserting data.
        """
        self.validate_table(table_name)

        if df is None or df.empty:
            return

        columns = ", ".join(df.columns)
        placeholders = ", ".join(["?" for _ in df.columns])
        query = query.format(table_name=table_name, columns=columns, placeholders=placeholders)

        records = [
            tuple(_to_sql_value(value) for value in row)
            for row in df.astype(object).itertuples(index=False, name=None)
        ]
        with self.connect_db() as conn:
            conn.executemany(query, records)
            conn.commit()

        rows_string = "row" if len(df) == 1 else "rows"
        logger.debug(f"Inserted up to {len(df)} {rows_string} into the {table_name} table.")

    def save_experiment_table(self, table: ExperimentTable) -> None:
        """Stores one run; storing the same (digest, experiment) twice changes nothing."""
        run = pd.DataFrame(
            [
                {
                    "digest": table.digest,
                    "experiment": table.name,
                    "seed": table.seed,
                    "config": json.dumps(table.config.result_dict(), sort_keys=True),
                }
            ]
        )
        rows = table.rows.copy()
        rows.insert(0, "row_index", range(len(rows)))
        rows.insert(0, "experiment", table.name)
        rows.insert(0, "digest", table.digest)
        rows["point_s_or_gamma_or_alpha"] = pd.to_numeric(rows["point_s_or_gamma_or_alpha"])
        for col in ["holds", "valid"]:
            rows[col] = rows[col].astype(int)

        self.insert_dataframe_to_db(df=run, table_name="runs")
        self.insert_dataframe_to_db(df=rows, table_name="experiment_rows")
        logger.info(f"Stored {table.name} run {table.digest} in {self.db_path}")

    def get_table_as_dataframe(self, table_name: str) -> pd.DataFrame:
        """Fetches a table from the database and returns it as a Pandas DataFrame."""
        self.validate_table(table_name)
        query = READ_TABLE_TO_DF.format(table_name=table_name)
        with self.connect_db() as conn:
            df = pd.read_sql_query(query, conn)

        logger.debug(f"Table '{table_name}' fetched as DataFrame.")
        return df

    def get_run_rows(self, digest: str, experiment: str) -> pd.DataFrame:
        """The stored rows of one run, in their original order."""
        with self.connect_db() as conn:
            return pd.read_sql_query(READ_RUN_ROWS, conn, params=(digest, experiment))
