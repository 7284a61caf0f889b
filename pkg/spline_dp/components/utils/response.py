from datetime import datetime

from pydantic import BaseModel, ConfigDict

from spline_dp import __version__
from spline_dp.utils.utility import get_current_time


class BaseResponse(BaseModel):
    model_config = ConfigDict(
        from_attributes=True,
        arbitrary_types_allowed=True,
        validate_assignment=True,
        use_enum_values=True,
        str_strip_whitespace=True,
    )


class RunManifest(BaseResponse):
    """Written next to every set of run outputs."""

    config_path: str | None
    config_hash: str
    output_dir: str
    started_at: datetime
    finished_at: datetime | None = None
    tool_version: str
    command: str
    files: list[str] = []

    @classmethod
    def start(cls, config_path, config_hash: str, output_dir, command: str) -> "RunManifest":
        return cls(
            config_path=str(config_path) if config_path is not None else None,
            config_hash=config_hash,
            output_dir=str(output_dir),
            started_at=get_current_time(),
            tool_version=__version__,
            command=command,
        )

    def finish(self, files) -> "RunManifest":
        return self.model_copy(
            update={"finished_at": get_current_time(), "files": sorted(str(f) for f in files)}
        )
