class ChebylieError(Exception):
    pass


# Invalid input: bad type string, rank bound, index, non-dominant weight, k < 1
class ConstraintError(ChebylieError, ValueError):
    pass


class CoordinateOverflowError(ChebylieError, OverflowError):
    pass


class GroupTooLargeError(ChebylieError):
    def __init__(self, order: int, cap: int):
        self.order = order
        self.cap = cap
        super().__init__(f"group too large: |W| = {order} exceeds the enumeration cap {cap} "
                         f"(raise it with --max-weyl-order)")


class BudgetExceededError(ChebylieError):
    def __init__(self, pairs: int, budget: int):
        self.pairs = pairs
        self.budget = budget
        super().__init__(f"coset-pair count {pairs} exceeds the pair budget {budget} "
                         f"(raise it with --max-pair-budget)")


# An exactness or termination assertion fired inside an algorithm
class ConsistencyError(ChebylieError, ArithmeticError):
    pass
