import json
import logging
import sqlite3
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..models.suite import SuiteConfig, SuiteResult, Violation

logger = logging.getLogger(__name__)


class ResultStore:
    """SQLite store for verification runs, their violations and per-check minimum slacks"""

    def __init__(self, db_path: str = "./data/database/subbary.db"):
        self.db_path = db_path
        self._ensure_directory_exists()
        self._initialize_database()

    def _ensure_directory_exists(self):
        """Create database directory if it doesn't exist"""
        db_dir = Path(self.db_path).parent
        db_dir.mkdir(parents=True, exist_ok=True)

    def _initialize_database(self):
        """Initialize database tables"""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                cursor.execute("""
                    CREATE TABLE IF NOT EXISTS suite_runs (
                        id INTEGER PRIMARY KEY AUTOINCREMENT,
                        started_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
                        suite TEXT NOT NULL,
                        seed INTEGER NOT NULL,
                        config TEXT NOT NULL,
                        checks_run INTEGER NOT NULL,
                        violation_count INTEGER NOT NULL,
                        digest TEXT NOT NULL,
                        runtime REAL
                    )
                """)

                cursor.execute("""
                    CREATE TABLE IF NOT EXISTS suite_violations (
                        id INTEGER PRIMARY KEY AUTOINCREMENT,
                        run_id INTEGER NOT NULL,
                        check_name TEXT NOT NULL,
                        inputs_digest TEXT NOT NULL,
                        slack REAL NOT NULL,
                        FOREIGN KEY (run_id) REFERENCES suite_runs (id)
                    )
                """)

                cursor.execute("""
                    CREATE TABLE IF NOT EXISTS suite_min_slack (
                        run_id INTEGER NOT NULL,
                        check_name TEXT NOT NULL,
                        min_slack REAL NOT NULL,
                        PRIMARY KEY (run_id, check_name),
                        FOREIGN KEY (run_id) REFERENCES suite_runs (id)
                    )
                """)

                conn.commit()
                logger.info("Result store initialized successfully")

        except Exception as e:
            logger.error(f"Error initializing result store: {str(e)}")
            raise

    def save_suite_result(self, config: SuiteConfig, result: SuiteResult) -> int:
        """Save a suite run and return its ID"""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                cursor.execute("""
                    INSERT INTO suite_runs
                    (suite, seed, config, checks_run, violation_count, digest, runtime)
                    VALUES (?, ?, ?, ?, ?, ?, ?)
                """, (
                    result.suite,
                    config.seed,
                    json.dumps(config.to_dict()),
                    result.checks_run,
                    len(result.violations),
                    result.digest(),
                    result.runtime,
                ))
                run_id = cursor.lastrowid

                cursor.executemany("""
                    INSERT INTO suite_violations (run_id, check_name, inputs_digest, slack)
                    VALUES (?, ?, ?, ?)
                """, [(run_id, v.check, v.inputs_digest, v.slack) for v in result.violations])

                cursor.executemany("""
                    INSERT INTO suite_min_slack (run_id, check_name, min_slack)
                    VALUES (?, ?, ?)
                """, [(run_id, check, slack) for check, slack in result.min_slack.items()])

                conn.commit()
                logger.info(f"Suite run saved with ID: {run_id}")
                return run_id

        except Exception as e:
            logger.error(f"Error saving suite run: {str(e)}")
            raise

    def get_suite_run(self, run_id: int) -> Optional[Dict[str, Any]]:
        """Retrieve one run with its minimum slacks"""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                cursor.execute("""
                    SELECT id, started_at, suite, seed, config, checks_run,
                           violation_count, digest, runtime
                    FROM suite_runs WHERE id = ?
                """, (run_id,))

                row = cursor.fetchone()
                if not row:
                    return None

                cursor.execute("""
                    SELECT check_name, min_slack FROM suite_min_slack
                    WHERE run_id = ? ORDER BY check_name
                """, (run_id,))

                return {
                    'id': row[0],
                    'started_at': row[1],
                    'suite': row[2],
                    'seed': row[3],
                    'config': json.loads(row[4]),
                    'checks_run': row[5],
                    'violation_count': row[6],
                    'digest': row[7],
                    'runtime': row[8],
                    'min_slack': {name: slack for name, slack in cursor.fetchall()},
                }

        except Exception as e:
            logger.error(f"Error retrieving suite run: {str(e)}")
            return None

    def get_recent_runs(self, limit: int = 10) -> List[Dict[str, Any]]:
        """Get recent runs with basic info"""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                cursor.execute("""
                    SELECT id, started_at, suite, seed, checks_run, violation_count, digest, runtime
                    FROM suite_runs
                    ORDER BY id DESC
                    LIMIT ?
                """, (limit,))

                runs = []
                for row in cursor.fetchall():
                    runs.append({
                        'id': row[0],
                        'started_at': row[1],
                        'suite': row[2],
                        'seed': row[3],
                        'checks_run': row[4],
                        'violation_count': row[5],
                        'digest': row[6],
                        'runtime': row[7],
                    })

                return runs

        except Exception as e:
            logger.error(f"Error retrieving recent runs: {str(e)}")
            return []

    def get_violations(self, run_id: int) -> List[Violation]:
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                cursor.execute("""
                    SELECT check_name, inputs_digest, slack FROM suite_violations
                    WHERE run_id = ? ORDER BY id
                """, (run_id,))

                return [Violation(*row) for row in cursor.fetchall()]

        except Exception as e:
            logger.error(f"Error retrieving violations: {str(e)}")
            return []

    def find_runs_by_digest(self, digest: str) -> List[int]:
        """IDs of every run that produced this result digest"""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()
                cursor.execute("SELECT id FROM suite_runs WHERE digest = ? ORDER BY id", (digest,))
                return [row[0] for row in cursor.fetchall()]

        except Exception as e:
            logger.error(f"Error searching runs: {str(e)}")
            return []

    def get_statistics(self) -> Dict[str, Any]:
        """Get run statistics"""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                cursor.execute("SELECT COUNT(*), COALESCE(SUM(checks_run), 0) FROM suite_runs")
                run_count, checks = cursor.fetchone()

                cursor.execute("SELECT COUNT(*) FROM suite_runs WHERE violation_count > 0")
                failing_runs = cursor.fetchone()[0]

                cursor.execute("""
                    SELECT COUNT(*) FROM suite_runs
                    WHERE started_at > datetime('now', '-7 days')
                """)
                recent_runs = cursor.fetchone()[0]

                cursor.execute("SELECT MIN(min_slack) FROM suite_min_slack")
                smallest = cursor.fetchone()[0]

                return {
                    'total_runs': run_count,
                    'total_checks': checks,
                    'failing_runs': failing_runs,
                    'runs_this_week': recent_runs,
                    'smallest_slack': smallest,
                }

        except Exception as e:
            logger.error(f"Error getting statistics: {str(e)}")
            return {}

    def cleanup_old_runs(self, days: int = 30):
        """Delete runs older than the given number of days"""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()
                cutoff = f"-{int(days)} days"

                cursor.execute("""
                    DELETE FROM suite_violations WHERE run_id IN
                    (SELECT id FROM suite_runs WHERE started_at < datetime('now', ?))
                """, (cutoff,))
                cursor.execute("""
                    DELETE FROM suite_min_slack WHERE run_id IN
                    (SELECT id FROM suite_runs WHERE started_at < datetime('now', ?))
                """, (cutoff,))
                cursor.execute("DELETE FROM suite_runs WHERE started_at < datetime('now', ?)", (cutoff,))

                conn.commit()
                logger.info(f"Cleaned up runs older than {days} days")

        except Exception as e:
            logger.error(f"Error cleaning up runs: {str(e)}")
            raise
