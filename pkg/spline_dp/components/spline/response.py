from spline_dp.components.utils.response import BaseResponse


class SpaceReport(BaseResponse):
    n_simplices: int
    dhat: int
    ahat: int
    rank_H: int
    free_parameters: int

    def line(self) -> str:
        return (
            f"J={self.n_simplices} dhat={self.dhat} ahat={self.ahat} "
            f"rank_H={self.rank_H} free={self.free_parameters}"
        )
