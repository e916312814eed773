import pytest

from scanforge.corpus import SyntheticSpec, generate_synthetic_scene


@pytest.fixture(scope="session")
def demo_scene(tmp_path_factory):
    """One synthetic scene (3 objects + wall) shared by read-only tests."""
    out = tmp_path_factory.mktemp("demo_corpus")
    record, manifest = generate_synthetic_scene(42, SyntheticSpec(include_wall=True), out)
    return record, manifest


@pytest.fixture()
def pipeline_env(tmp_path):
    """Fresh mock-backed gateway/store/config rooted in tmp_path."""
    from scanforge.llm import Gateway, MockBackend
    from scanforge.pipeline import JobStore, PipelineConfig

    gateway = Gateway({"mock": MockBackend(seed=1)}, cache_dir=tmp_path / "cache")
    store = JobStore(tmp_path / "store")
    cfg = PipelineConfig(embed_category_hint=True, images_root=str(tmp_path / "staged"))
    return cfg, store, gateway
