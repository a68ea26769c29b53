class SumsetLabError(Exception):
    """Base class for all errors raised by sumset_lab."""


class InvalidInputError(SumsetLabError, ValueError):
    pass


class BudgetExceededError(SumsetLabError):
    """An exhaustive search would exceed the subset-evaluation budget."""


class CampaignError(SumsetLabError):
    pass
