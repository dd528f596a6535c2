"""The household world: domain fixture, scenes, problems and samples."""

from .dataset import (
    FIELDS,
    TASK_TYPES,
    GenerationError,
    Sample,
    SampleFormatError,
    generate_dataset,
    generate_sample,
    load_samples,
    parse_mix,
    read_records,
    samples_by_id,
    save_samples,
)
from .world import (
    CLASS_FACTS,
    CONTAINERS,
    MOVABLES,
    RECEPTACLES,
    SLICEABLE,
    START,
    Scene,
    SceneError,
    build_problem,
    class_facts,
    domain_text,
    household_domain,
    parse_relations,
    scene_types,
)

__all__ = [name for name in dir() if not name.startswith("_")]
