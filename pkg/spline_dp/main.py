import typer

from spline_dp.components.estimator.routes import estimator_router
from spline_dp.components.harness.routes import harness_router
from spline_dp.components.spline.routes import spline_router
from spline_dp.config.logger_config import enable_console_logging
from spline_dp.config.setting import get_settings


def include_router(application: typer.Typer, router: typer.Typer) -> None:
    """Mount a feature's commands at the top level of the application."""
    application.registered_commands.extend(router.registered_commands)


def create_application() -> typer.Typer:
    settings = get_settings()
    application = typer.Typer(name=settings.APP_NAME, no_args_is_help=True, add_completion=False)
    include_router(application, spline_router)
    include_router(application, harness_router)
    include_router(application, estimator_router)

    @application.callback()
    def root(verbose: bool = typer.Option(False, "--verbose", "-v", help="log to the console")):
        """Spline dynamic programming: simplex B-spline value functions learned by RLSTD."""
        if verbose or settings.DEBUG:
            enable_console_logging("DEBUG" if settings.DEBUG else "INFO")

    return application


app = create_application()


if __name__ == "__main__":
    app()
