from .demo import DemoResult, run_smartcity
from .gas import check_gas_rows, run_gas_bench
from .latency import check_difficulty_rows, check_latency_rows, parse_n_list, run_latency_bench
from .reports import GasReport, LatencyReport, emit_csv, format_table
