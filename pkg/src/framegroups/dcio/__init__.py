from .config import ScenarioConfig, TrajectoryParams, default_config, load_config
from .sim import RunLog, generate_truth, run, summarize, time_to_converge, write_csv

__all__ = [
    "ScenarioConfig", "TrajectoryParams", "default_config", "load_config",
    "RunLog", "generate_truth", "run", "summarize", "time_to_converge",
    "write_csv",
]
