from llm.models import LlmEndpointConfig


def build_endpoint(base_url: str, model: str, api_key_env: str) -> LlmEndpointConfig:
    """Construct an endpoint config from flat settings values."""
    return LlmEndpointConfig(base_url=base_url, model=model, api_key_env=api_key_env)
