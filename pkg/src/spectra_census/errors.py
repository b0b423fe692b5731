"""Shared exception base carrying module-qualified error codes."""


class SpectraCensusError(Exception):
    """Base class for all package errors.

    Subclasses get a ``code`` of the form ``<module>.<ClassName>`` so the
    CLI can emit machine-readable error records.
    """

    code = "spectra_census.Error"

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        module = cls.__module__.rsplit(".", 1)[-1]
        cls.code = f"{module}.{cls.__name__}"
