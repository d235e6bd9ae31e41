from enum import Enum


class FeatureVariant(Enum):
    """Feature representations a classifier can be trained on"""

    CUES = "cues"
    MC13_WHOLE = "MC13_whole"
    MC13_REGION = "MC13_region"
    MC39_WHOLE = "MC39_whole"
    MC39_REGION = "MC39_region"
    FFT1024 = "FFT1024"
    FB40 = "FB40"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_name(cls, name: str) -> "FeatureVariant":
        for variant in cls:
            if variant.value.lower() == name.strip().lower():
                return variant
        raise ValueError(f"unknown feature variant '{name}' (expected one of {', '.join(v.value for v in cls)})")

    @property
    def is_mfcc(self) -> bool:
        return self in (FeatureVariant.MC13_WHOLE, FeatureVariant.MC13_REGION, FeatureVariant.MC39_WHOLE, FeatureVariant.MC39_REGION)

    @property
    def is_raw(self) -> bool:
        return self in (FeatureVariant.FFT1024, FeatureVariant.FB40)

    @property
    def with_deltas(self) -> bool:
        return self in (FeatureVariant.MC39_WHOLE, FeatureVariant.MC39_REGION)

    @property
    def whole_phone(self) -> bool:
        return self in (FeatureVariant.MC13_WHOLE, FeatureVariant.MC39_WHOLE)

    def dim(self, include_f2: bool = False) -> int:
        if self is FeatureVariant.CUES:
            return 9 if include_f2 else 8
        if self.is_mfcc:
            return 39 if self.with_deltas else 13
        return 513 if self is FeatureVariant.FFT1024 else 40
