"""Reinforcement-learned path control for SDN controllers.

Learns a forwarding path between two hosts with a small policy network
trained against the live topology, then compiles the path into static
flow entries and pushes them to the controller's northbound REST API.
"""

from .ctl import (
    ControllerEndpoint,
    MockController,
    ProtocolError,
    PushReport,
    TransportError,
    fetch_topology,
    push_flows,
    run_mock_controller,
)
from .flows import (
    CompileError,
    FlowBatch,
    FlowEntry,
    ForwardingSimulator,
    compile_flows,
    parse_entry,
    render_entry,
)
from .pathfind import (
    ExtractionError,
    NoPathError,
    Path,
    Verdict,
    bfs_shortest,
    compare_paths,
    dijkstra_shortest,
    greedy_rollout,
    is_valid_path,
)
from .policynet import (
    NumericError,
    PolicyNet,
    create_model,
    forward,
    gradients,
    load_checkpoint,
    loss,
    save_checkpoint,
    train_step,
)
from .rlenv import IllegalStepError, PathEnv, StepOutcome, mask_and_renormalize, sample_action
from .topo import (
    AdjacencyModel,
    ConnectivityError,
    DegenerateEndpointsError,
    EndpointError,
    Host,
    Link,
    Topology,
    TopologyError,
    TopologyParseError,
    build_adjacency,
    neighbors,
    parse_topology,
)
from .trainer import TrainConfig, TrainingError, TrainReport, TraceLog, train

__version__ = "0.1.0"

__all__ = [
    "AdjacencyModel",
    "CompileError",
    "ConnectivityError",
    "ControllerEndpoint",
    "DegenerateEndpointsError",
    "EndpointError",
    "ExtractionError",
    "FlowBatch",
    "FlowEntry",
    "ForwardingSimulator",
    "Host",
    "IllegalStepError",
    "Link",
    "MockController",
    "NoPathError",
    "NumericError",
    "Path",
    "PathEnv",
    "PolicyNet",
    "ProtocolError",
    "PushReport",
    "StepOutcome",
    "Topology",
    "TopologyError",
    "TopologyParseError",
    "TrainConfig",
    "TrainingError",
    "TrainReport",
    "TraceLog",
    "TransportError",
    "Verdict",
    "bfs_shortest",
    "build_adjacency",
    "compare_paths",
    "compile_flows",
    "create_model",
    "dijkstra_shortest",
    "fetch_topology",
    "forward",
    "gradients",
    "greedy_rollout",
    "is_valid_path",
    "load_checkpoint",
    "loss",
    "mask_and_renormalize",
    "neighbors",
    "parse_entry",
    "parse_topology",
    "push_flows",
    "render_entry",
    "run_mock_controller",
    "sample_action",
    "save_checkpoint",
    "train",
    "train_step",
]
