"""
Base model utilities for analytics records.

Provides lightweight dataclass helpers to standardize dictionary
conversion and instance creation across pipeline stages.
"""

from dataclasses import asdict, fields, is_dataclass
from typing import Any, Dict, Type, TypeVar


T = TypeVar("T", bound="FactoryMixin")


class BaseModel:
    """
    Common parent class for all dataclass records.
    """

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert dataclass instance to a dictionary.

        Returns:
            Dictionary representation of the dataclass.
        """
        return asdict(self)


class FactoryMixin:
    """
    Mixin providing factory construction from dictionaries.
    """

    @classmethod
    def from_dict(cls: Type[T], data: Dict[str, Any]) -> T:
        """
        Create a dataclass instance from a dictionary.

        Unknown keys are ignored so exported files may carry extra columns.

        Args:
            data: Field-value mapping.

        Returns:
            Instantiated dataclass object.
        """
        if not is_dataclass(cls):
            raise TypeError(f"{cls.__name__} is not a dataclass")
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


__all__ = ["BaseModel", "FactoryMixin"]
