from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # API Settings
    API_HOST: str = "0.0.0.0"
    API_PORT: int = 8000
    DEBUG: bool = True
    ENV: str = "development"

    # Logging
    LOG_LEVEL: str = "INFO"

    # Engine limits
    # Hard cap on the number of predictable stopping times one enumeration may produce
    BUDGET: int = 20_000
    # Cap on quantifier evaluations a single registered property may spend
    CHECK_BUDGET: int = 250_000

    # Fuzzing (0 = one worker per CPU)
    FUZZ_WORKERS: int = 0

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        env_prefix = "SNELL_"
        case_sensitive = True


settings = Settings()
