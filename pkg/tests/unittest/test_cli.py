import os
import tempfile
import unittest

from click.testing import CliRunner

from twin_trust_service.cli import cli

FILE_PATH = os.path.dirname(__file__)
CONFIG_FILE_PATH = os.path.join(FILE_PATH, "../test_config.yml")


class TestCli(unittest.TestCase):
    def setUp(self):
        self.runner = CliRunner()

    def invoke(self, *args):
        return self.runner.invoke(cli, ["--config", CONFIG_FILE_PATH, *args])

    def test_bench_gas(self):
        result = self.invoke("bench", "gas")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("627200", result.output)

    def test_bench_gas_csv(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "gas.csv")
            result = self.runner.invoke(
                cli, ["--config", CONFIG_FILE_PATH, "--out", path, "bench", "gas", "--mode", "Logs"]
            )
            self.assertEqual(result.exit_code, 0, result.output)
            with open(path) as f:
                self.assertEqual(len(f.read().splitlines()), 3)

    def test_unwritable_out(self):
        result = self.runner.invoke(
            cli, ["--out", "/nonexistent/dir/gas.csv", "bench", "gas", "--mode", "Logs"]
        )
        self.assertEqual(result.exit_code, 1)

    def test_bench_latency(self):
        result = self.invoke("bench", "latency", "--n", "3,6", "--workers", "2", "--mode", "Logs")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("mean_per_tx", result.output)

    def test_bench_latency_over_difficulties(self):
        result = self.invoke(
            "bench", "latency", "--n", "3", "--workers", "2", "--mode", "Logs",
            "--difficulty", "0", "--difficulty", "2",
        )
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(result.output.count("Logs"), 2)

    def test_bad_n(self):
        self.assertEqual(self.invoke("bench", "latency", "--n", "abc").exit_code, 2)

    def test_bad_mode(self):
        self.assertEqual(self.invoke("bench", "gas", "--mode", "Storage").exit_code, 2)

    def test_demo(self):
        result = self.invoke("demo", "smartcity", "--skip-revocation")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("[SKIPPED] revoked water provider is denied", result.output)
