class QuasicutError(Exception): ...


class QuasicutConfigurationError(QuasicutError): ...


class QuasicutValidationError(QuasicutError, ValueError): ...


class QuasicutInfeasibleError(QuasicutValidationError): ...


class QuasicutArtifactError(QuasicutError): ...


class QuasicutInternalError(QuasicutError): ...


class QuasicutBudgetError(QuasicutError):
    count: int
    budget: int

    def __init__(self, what: str, *, count: int, budget: int) -> None:
        super().__init__(f"{what}: {count} items exceed the configured budget of {budget}")
        self.count = count
        self.budget = budget
