import threading


class KeyedSingleton(type):
    """One instance per (class, key). The key is the keyword argument named by the
    class attribute ``singleton_key``; classes without it get a plain singleton."""
    _instances = {}
    _lock = threading.Lock()

    def __call__(cls, *args, **kwargs):
        key_name = getattr(cls, "singleton_key", None)
        key = kwargs.get(key_name) if key_name else None
        slot = (cls, key) if key is not None else cls
        with cls._lock:
            if slot not in cls._instances:
                cls._instances[slot] = super(KeyedSingleton, cls).__call__(*args, **kwargs)
            return cls._instances[slot]

    @classmethod
    def forget(mcs, cls):
        with mcs._lock:
            for slot in [s for s in mcs._instances if s is cls or (isinstance(s, tuple) and s[0] is cls)]:
                del mcs._instances[slot]
